use std::fmt;

/// Everything the command line can fail with. Each variant names the key it
/// concerns so the one-line report can be parsed by scripts.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown flag {0:?}")]
    UnknownFlag(String),
    #[error("missing required flag {0:?}")]
    MissingRequired(String),
    #[error("malformed file for {key:?}: {reason}")]
    MalformedFile { key: String, reason: String },
    #[error("invalid value for {key:?}: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: coordcap_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn invalid(key: &str, reason: impl fmt::Display) -> Self {
        CliError::InvalidValue {
            key: key.to_string(),
            reason: reason.to_string(),
        }
    }

    pub fn malformed(key: &str, reason: impl fmt::Display) -> Self {
        CliError::MalformedFile {
            key: key.to_string(),
            reason: reason.to_string(),
        }
    }

    pub fn io(path: impl fmt::Display, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::UnknownFlag(_) => "unknown-flag",
            CliError::MissingRequired(_) => "missing-required",
            CliError::MalformedFile { .. } => "malformed-file",
            CliError::InvalidValue { .. } => "invalid-value",
            CliError::Core { .. } => "core",
            CliError::Io { .. } => "io",
        }
    }

    pub fn key(&self) -> Option<&str> {
        match self {
            CliError::UnknownFlag(k) | CliError::MissingRequired(k) => Some(k),
            CliError::MalformedFile { key, .. } | CliError::InvalidValue { key, .. } => Some(key),
            CliError::Core { context, .. } => Some(context),
            CliError::Io { .. } => None,
        }
    }

    /// 2 for usage errors, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core { .. } | CliError::Io { .. } => 1,
            _ => 2,
        }
    }

    /// `error kind=... key=... message="..."` on a single line.
    pub fn report(&self) -> String {
        let msg = self
            .to_string()
            .replace('\\', "\\\\")
            .replace('"', "\\\"")
            .replace('\n', " ");
        match self.key() {
            Some(k) => format!("error kind={} key={} message=\"{}\"", self.kind(), k, msg),
            None => format!("error kind={} message=\"{}\"", self.kind(), msg),
        }
    }
}

/// Attaches the owning command or key to a core error.
pub trait Context<T> {
    fn context(self, what: &str) -> Result<T>;
}

impl<T> Context<T> for coordcap_core::Result<T> {
    fn context(self, what: &str) -> Result<T> {
        self.map_err(|source| CliError::Core {
            context: what.to_string(),
            source,
        })
    }
}
