use std::process::exit;

fn main() {
    env_logger::init();
    exit(staircase::harness::cli::cli_main(std::env::args_os()));
}
