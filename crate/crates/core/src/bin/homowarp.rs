fn main() {
    std::process::exit(homowarp::cli::run(std::env::args_os()));
}
