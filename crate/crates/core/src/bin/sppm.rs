fn main() {
    std::process::exit(sppm::cli::main_from_env());
}
