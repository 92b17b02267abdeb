fn main() {
    std::process::exit(fbmcast::cli::run());
}
