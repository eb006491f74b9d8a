fn main() {
    std::process::exit(contraction_lab::cli::run());
}
