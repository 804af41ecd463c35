fn main() {
    std::process::exit(maxreg::cli::run());
}
