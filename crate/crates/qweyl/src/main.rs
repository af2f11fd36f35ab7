fn main() {
    std::process::exit(qweyl::cli::run());
}
