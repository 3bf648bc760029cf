fn main() {
    std::process::exit(hballs::cli::run(std::env::args_os()));
}
