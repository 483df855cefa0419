fn main() {
    std::process::exit(fiwalk::cli::run(std::env::args_os()));
}
