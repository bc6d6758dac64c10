use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(scene_interp::cli::run() as u8)
}
