fn main() {
    std::process::exit(substream::cli::run(std::env::args_os()));
}
