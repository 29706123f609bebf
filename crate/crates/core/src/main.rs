fn main() {
    std::process::exit(framelet::cli::run(std::env::args_os()));
}
