use env_logger::Env;

fn main() {
    env_logger::Builder::from_env(Env::new().filter_or("HURSTQV_LOG", "off")).init();
    std::process::exit(hurstqv::cli::run(std::env::args_os()));
}
