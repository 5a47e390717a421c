fn main() {
    std::process::exit(codsketch::cli::run(std::env::args_os()));
}
