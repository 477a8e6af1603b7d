fn main() {
    std::process::exit(vstp_cli::run(std::env::args_os()));
}
