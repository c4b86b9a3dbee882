fn main() {
    std::process::exit(heiscr::cli::run());
}
