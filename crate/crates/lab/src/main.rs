fn main() {
    let code = pss_lab::cli::run(std::env::args().skip(1).collect());
    std::process::exit(code);
}
