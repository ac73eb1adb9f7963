fn main() {
    std::process::exit(sp2_curvature::cli::run(std::env::args_os()));
}
