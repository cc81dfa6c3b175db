fn main() {
    std::process::exit(qcorr::cli::run(std::env::args_os()));
}
