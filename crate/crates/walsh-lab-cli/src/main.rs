fn main() {
    std::process::exit(walsh_lab_cli::run(std::env::args_os()));
}
