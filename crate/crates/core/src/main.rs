fn main() {
    std::process::exit(ring_crystal::cli::run(std::env::args_os()));
}
