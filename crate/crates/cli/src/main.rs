fn main() {
    std::process::exit(iocr_cli::run(std::env::args_os()));
}
