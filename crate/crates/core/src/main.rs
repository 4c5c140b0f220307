fn main() {
    std::process::exit(flagfold::cli::run(std::env::args_os()));
}
