fn main() {
    std::process::exit(fractalcalc::cli::run());
}
