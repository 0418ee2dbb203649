fn main() {
    std::process::exit(exprk_harness::run_cli(std::env::args_os()));
}
