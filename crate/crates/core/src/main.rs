fn main() {
    std::process::exit(sphere_tikhonov::cli::run_command(std::env::args_os()));
}
