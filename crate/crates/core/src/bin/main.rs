fn main() {
    std::process::exit(smealy::cli::run(std::env::args_os()));
}
