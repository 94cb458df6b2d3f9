use std::io::Write;

fn main() {
    let (stdout, stderr) = (std::io::stdout(), std::io::stderr());
    let code = std::panic::catch_unwind(|| {
        let (mut out, mut err) = (stdout.lock(), stderr.lock());
        let code = agt_core::cli::run(std::env::args_os(), &mut out, &mut err);
        let _ = out.flush();
        code
    })
    .unwrap_or(agt_core::cli::EXIT_INTERNAL);
    std::process::exit(code);
}
