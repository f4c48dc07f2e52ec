fn main() {
    std::process::exit(frame_decomp::cli::run(std::env::args_os()));
}
