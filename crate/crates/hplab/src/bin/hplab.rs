fn main() {
    std::process::exit(hplab::cli::run(std::env::args_os()));
}
