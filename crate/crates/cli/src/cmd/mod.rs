pub mod compare;
pub mod modedrop;
pub mod score;
pub mod train;
pub mod verify;

use std::path::PathBuf;

use crate::settings::Settings;
use crate::CliError;

/// Options shared by every subcommand.
pub struct Context {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

impl Context {
    pub fn settings(&self) -> Result<Settings, CliError> {
        Settings::load(self.config.as_deref())
    }
}
