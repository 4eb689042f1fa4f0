use std::process::ExitCode;

fn main() -> ExitCode {
    course_advisor::cli::run()
}
