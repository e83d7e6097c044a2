use ssrlsc::Error;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = ssrlsc::cli::run(std::env::args_os().collect()) {
        // a closed pipe on stdout (e.g. `| head`) is not an error
        if let Error::Io { path, source } = &e {
            if path.as_os_str() == "<stdout>" && source.kind() == std::io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("error: {e}");
        let mut source = std::error::Error::source(&e);
        while let Some(s) = source {
            eprintln!("  caused by: {s}");
            source = s.source();
        }
        std::process::exit(1);
    }
}
