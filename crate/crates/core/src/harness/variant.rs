use crate::control::Pipeline;
use crate::error::{Error, Result};
use crate::reid::Parts;
use serde::{Deserialize, Serialize};

/// One row of the ablation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantConfig {
    pub name: String,
    pub use_motion_tracker: bool,
    pub use_torso_id: bool,
    pub use_face_id: bool,
    pub use_visual_servo: bool,
    pub use_path_planning: bool,
}

/// Preset names in table order.
pub const PRESET_NAMES: [&str; 7] = [
    "ours_wo_reid",
    "ours_wo_motion",
    "ours_wo_torso",
    "ours_wo_face",
    "ours_wo_visualservo",
    "ours_wo_pathplanning",
    "ours",
];

impl VariantConfig {
    fn row(name: &str, motion: bool, torso: bool, face: bool, servo: bool, planning: bool) -> Self {
        Self {
            name: name.to_string(),
            use_motion_tracker: motion,
            use_torso_id: torso,
            use_face_id: face,
            use_visual_servo: servo,
            use_path_planning: planning,
        }
    }

    /// Looks up a preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        let v = match name {
            "ours" => Self::row(name, true, true, true, true, true),
            "ours_wo_reid" => Self::row(name, true, false, false, true, true),
            "ours_wo_motion" => Self::row(name, false, true, true, true, true),
            "ours_wo_torso" => Self::row(name, true, false, true, true, true),
            "ours_wo_face" => Self::row(name, true, true, false, true, true),
            "ours_wo_visualservo" => Self::row(name, true, true, true, false, true),
            "ours_wo_pathplanning" => Self::row(name, true, true, true, true, false),
            other => return Err(Error::Config(format!("unknown variant '{other}'"))),
        };
        Ok(v)
    }

    pub fn presets() -> Vec<Self> {
        PRESET_NAMES.iter().map(|n| Self::preset(n).expect("preset names are valid")).collect()
    }

    pub fn uses_reid(&self) -> bool {
        self.use_face_id || self.use_torso_id
    }

    pub fn validate(&self) -> Result<()> {
        if !self.use_visual_servo && !self.use_path_planning {
            return Err(Error::Config(format!("variant '{}' has no way to act", self.name)));
        }
        if !self.use_motion_tracker && !self.uses_reid() {
            return Err(Error::Config(format!("variant '{}' has neither tracker nor re-id", self.name)));
        }
        Ok(())
    }

    pub fn pipeline(&self) -> Pipeline {
        Pipeline {
            motion_tracker: self.use_motion_tracker,
            parts: Parts { face: self.use_face_id, torso: self.use_torso_id },
            visual_servo: self.use_visual_servo,
            path_planning: self.use_path_planning,
        }
    }

    /// Human-readable label, e.g. `Ours_w/o_reid`.
    pub fn label(&self) -> String {
        match self.name.strip_prefix("ours_wo_") {
            Some(rest) => format!("Ours_w/o_{rest}"),
            None if self.name == "ours" => "Ours".to_string(),
            None => self.name.clone(),
        }
    }
}
