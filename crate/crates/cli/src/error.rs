use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] fasris_core::Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot write output: {0}")]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// Whether the failure came from the numbers rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        use fasris_core::Error as E;
        matches!(
            self,
            CliError::Core(E::Numerics(_) | E::NegativeArgument { .. } | E::Classification { .. })
        )
    }

    /// 1 for bad input, 2 for a numerical failure.
    pub fn exit_code(&self) -> u8 {
        if self.is_numerical() {
            2
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fasris_core::numerics::NumericsError;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(fasris_core::Error::NoCeiling).exit_code(), 1);
        assert_eq!(
            CliError::Core(NumericsError::DegenerateQuadratic.into()).exit_code(),
            2
        );
        let parse = CliError::Parse {
            source_name: "a.conf".into(),
            line: 3,
            msg: "bad".into(),
        };
        assert_eq!(parse.to_string(), "a.conf:3: bad");
        assert_eq!(parse.exit_code(), 1);
    }
}
