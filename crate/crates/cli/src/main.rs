fn main() {
    std::process::exit(linfqmc_cli::run(std::env::args_os()));
}
