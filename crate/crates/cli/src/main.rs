fn main() {
    std::process::exit(csl_cutoff_cli::run(std::env::args_os()));
}
