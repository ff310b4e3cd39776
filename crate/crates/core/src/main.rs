fn main() {
    let args: Vec<String> = std::env::args().collect();
    let env_seed = std::env::var(branescope::cli::SEED_ENV).ok();
    let code = branescope::cli::run(
        &args,
        env_seed.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
