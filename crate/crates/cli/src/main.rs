fn main() {
    std::process::exit(markov_ot_cli::run_command(std::env::args_os()));
}
