fn main() {
    std::process::exit(qrepeater::cli::main_exit_code());
}
