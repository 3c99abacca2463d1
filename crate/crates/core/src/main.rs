fn main() {
    std::process::exit(mordell::cli::run());
}
