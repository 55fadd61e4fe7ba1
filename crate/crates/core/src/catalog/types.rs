use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::quantity::{PerUnitKWh, WattHours};

/// Input or output medium of a generation task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modality {
    Text,
    Image,
    Audio,
    Video,
    #[serde(rename = "3d")]
    ThreeD,
}

impl Modality {
    pub const ALL: [Modality; 5] = [
        Modality::Text,
        Modality::Image,
        Modality::Audio,
        Modality::Video,
        Modality::ThreeD,
    ];

    /// Rank used when collapsing multi-modal inputs: video > 3d > image > audio > text.
    pub fn heaviness(self) -> u8 {
        match self {
            Modality::Text => 0,
            Modality::Audio => 1,
            Modality::Image => 2,
            Modality::ThreeD => 3,
            Modality::Video => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Text => "text",
            Modality::Image => "image",
            Modality::Audio => "audio",
            Modality::Video => "video",
            Modality::ThreeD => "3d",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Modality::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

/// Identifier of one of the thirteen measured generation tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskKind {
    #[serde(rename = "text-to-text")]
    TextToText,
    #[serde(rename = "text-to-image")]
    TextToImage,
    #[serde(rename = "audio-to-text")]
    AudioToText,
    #[serde(rename = "text-to-video")]
    TextToVideo,
    #[serde(rename = "text-to-3d")]
    TextTo3d,
    #[serde(rename = "text-to-audio")]
    TextToAudio,
    #[serde(rename = "image-to-text")]
    ImageToText,
    #[serde(rename = "image-to-image")]
    ImageToImage,
    #[serde(rename = "image-to-3d")]
    ImageTo3d,
    #[serde(rename = "video-to-text")]
    VideoToText,
    #[serde(rename = "video-to-video")]
    VideoToVideo,
    #[serde(rename = "audio-to-audio")]
    AudioToAudio,
    #[serde(rename = "image-to-video")]
    ImageToVideo,
}

impl TaskKind {
    /// All task kinds in measurement-table order.
    pub const ALL: [TaskKind; 13] = [
        TaskKind::TextToText,
        TaskKind::TextToImage,
        TaskKind::AudioToText,
        TaskKind::TextToVideo,
        TaskKind::TextTo3d,
        TaskKind::TextToAudio,
        TaskKind::ImageToText,
        TaskKind::ImageToImage,
        TaskKind::ImageTo3d,
        TaskKind::VideoToText,
        TaskKind::VideoToVideo,
        TaskKind::AudioToAudio,
        TaskKind::ImageToVideo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::TextToText => "text-to-text",
            TaskKind::TextToImage => "text-to-image",
            TaskKind::AudioToText => "audio-to-text",
            TaskKind::TextToVideo => "text-to-video",
            TaskKind::TextTo3d => "text-to-3d",
            TaskKind::TextToAudio => "text-to-audio",
            TaskKind::ImageToText => "image-to-text",
            TaskKind::ImageToImage => "image-to-image",
            TaskKind::ImageTo3d => "image-to-3d",
            TaskKind::VideoToText => "video-to-text",
            TaskKind::VideoToVideo => "video-to-video",
            TaskKind::AudioToAudio => "audio-to-audio",
            TaskKind::ImageToVideo => "image-to-video",
        }
    }

    pub fn input(self) -> Modality {
        self.modalities().0
    }

    pub fn output(self) -> Modality {
        self.modalities().1
    }

    fn modalities(self) -> (Modality, Modality) {
        use Modality::*;
        match self {
            TaskKind::TextToText => (Text, Text),
            TaskKind::TextToImage => (Text, Image),
            TaskKind::AudioToText => (Audio, Text),
            TaskKind::TextToVideo => (Text, Video),
            TaskKind::TextTo3d => (Text, ThreeD),
            TaskKind::TextToAudio => (Text, Audio),
            TaskKind::ImageToText => (Image, Text),
            TaskKind::ImageToImage => (Image, Image),
            TaskKind::ImageTo3d => (Image, ThreeD),
            TaskKind::VideoToText => (Video, Text),
            TaskKind::VideoToVideo => (Video, Video),
            TaskKind::AudioToAudio => (Audio, Audio),
            TaskKind::ImageToVideo => (Image, Video),
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

/// One of the seven stages of a research pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResearchPhase {
    ResearchPlanning,
    PrototypingBuilding,
    EvaluationUserStudies,
    DataCollection,
    AnalysisSynthesis,
    DisseminationCommunication,
    TrainingFineTuning,
}

impl ResearchPhase {
    pub const ALL: [ResearchPhase; 7] = [
        ResearchPhase::ResearchPlanning,
        ResearchPhase::PrototypingBuilding,
        ResearchPhase::EvaluationUserStudies,
        ResearchPhase::DataCollection,
        ResearchPhase::AnalysisSynthesis,
        ResearchPhase::DisseminationCommunication,
        ResearchPhase::TrainingFineTuning,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResearchPhase::ResearchPlanning => "research-planning",
            ResearchPhase::PrototypingBuilding => "prototyping-building",
            ResearchPhase::EvaluationUserStudies => "evaluation-user-studies",
            ResearchPhase::DataCollection => "data-collection",
            ResearchPhase::AnalysisSynthesis => "analysis-synthesis",
            ResearchPhase::DisseminationCommunication => "dissemination-communication",
            ResearchPhase::TrainingFineTuning => "training-fine-tuning",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ResearchPhase::ResearchPlanning => "Research planning",
            ResearchPhase::PrototypingBuilding => "Prototyping & building",
            ResearchPhase::EvaluationUserStudies => "Evaluation & user studies",
            ResearchPhase::DataCollection => "Data collection",
            ResearchPhase::AnalysisSynthesis => "Analysis & synthesis",
            ResearchPhase::DisseminationCommunication => "Dissemination & communication",
            ResearchPhase::TrainingFineTuning => "Training & fine-tuning",
        }
    }
}

impl fmt::Display for ResearchPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResearchPhase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ResearchPhase::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

/// What one unit of N means for a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CanonicalUnit {
    Prompt,
    Image,
    MinuteOfAudio,
    VideoClip,
    AudioClip,
    #[serde(rename = "3d-asset")]
    Asset3d,
}

impl CanonicalUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            CanonicalUnit::Prompt => "prompt",
            CanonicalUnit::Image => "image",
            CanonicalUnit::MinuteOfAudio => "minute-of-audio",
            CanonicalUnit::VideoClip => "video-clip",
            CanonicalUnit::AudioClip => "audio-clip",
            CanonicalUnit::Asset3d => "3d-asset",
        }
    }
}

/// Resolution at which a per-unit energy constant is taken to apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dimension", rename_all = "kebab-case")]
pub enum Resolution {
    Words { words: f64 },
    Pixels { width: f64, height: f64 },
    Seconds { seconds: f64 },
    Minutes { minutes: f64 },
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Words { words } => write!(f, "{words} words"),
            Resolution::Pixels { width, height } => write!(f, "{width}x{height} px"),
            Resolution::Seconds { seconds } => write!(f, "{seconds} s"),
            Resolution::Minutes { minutes } => write!(f, "{minutes} min"),
        }
    }
}

/// Partial replacement of baseline resolutions, keyed by dimension.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words_per_prompt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audio_minutes: Option<f64>,
}

impl BaselineOverrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn apply(&self, base: Resolution) -> Resolution {
        match base {
            Resolution::Words { words } => Resolution::Words {
                words: self.words_per_prompt.unwrap_or(words),
            },
            Resolution::Pixels { width, height } => Resolution::Pixels {
                width: self.image_width.unwrap_or(width),
                height: self.image_height.unwrap_or(height),
            },
            Resolution::Seconds { seconds } => Resolution::Seconds {
                seconds: self.clip_seconds.unwrap_or(seconds),
            },
            Resolution::Minutes { minutes } => Resolution::Minutes {
                minutes: self.audio_minutes.unwrap_or(minutes),
            },
        }
    }

    /// Returns the first non-positive or non-finite override.
    pub fn invalid_field(&self) -> Option<(&'static str, f64)> {
        [
            ("words_per_prompt", self.words_per_prompt),
            ("image_width", self.image_width),
            ("image_height", self.image_height),
            ("clip_seconds", self.clip_seconds),
            ("audio_minutes", self.audio_minutes),
        ]
        .into_iter()
        .find_map(|(name, v)| {
            v.filter(|v| !(v.is_finite() && *v > 0.0))
                .map(|v| (name, v))
        })
    }
}

/// A measured generation task and its per-interaction energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskType {
    pub id: TaskKind,
    pub proxy_model: &'static str,
    /// Wh per canonical unit, parsed from the literal below.
    #[serde(rename = "energy_per_unit_wh")]
    pub energy_per_unit: WattHours,
    #[serde(skip)]
    pub energy_literal: &'static str,
    #[serde(skip)]
    pub energy_per_unit_kwh: PerUnitKWh,
    pub canonical_unit: CanonicalUnit,
    pub baseline_resolution: Option<Resolution>,
}

/// Kind of value a form field accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueKind {
    Count,
    WordCount,
    PixelDimensions,
    Minutes,
    Seconds,
    GpuHours,
    Watts,
    Ratio,
}

/// How the estimator consumes a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldRole {
    /// Multiplies the base count directly.
    Usage,
    /// Minutes of audio, divided by the audio baseline.
    AudioMinutes,
    /// Words per processed item, divided by the word baseline.
    ItemWords,
    /// Words per prompt; contributes to the resolution factor.
    PromptWords,
    ImageWidth,
    ImageHeight,
    ClipSeconds,
    TestRuns,
    Interactions,
    GpuHours,
    DevicePower,
    Pue,
}

impl FieldRole {
    /// Whether the field scales against a baseline resolution.
    pub fn is_resolution(self) -> bool {
        matches!(
            self,
            FieldRole::PromptWords
                | FieldRole::ImageWidth
                | FieldRole::ImageHeight
                | FieldRole::ClipSeconds
        )
    }

    /// Whether a value for this role is meaningful with the given baseline.
    pub fn applies_to(self, baseline: Option<Resolution>) -> bool {
        match self {
            FieldRole::PromptWords | FieldRole::ItemWords => {
                matches!(baseline, Some(Resolution::Words { .. }))
            }
            FieldRole::ImageWidth | FieldRole::ImageHeight => {
                matches!(baseline, Some(Resolution::Pixels { .. }))
            }
            FieldRole::ClipSeconds => matches!(baseline, Some(Resolution::Seconds { .. })),
            FieldRole::AudioMinutes => matches!(baseline, Some(Resolution::Minutes { .. })),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub id: String,
    pub label: String,
    pub value_kind: ValueKind,
    pub role: FieldRole,
    pub required: bool,
    #[serde(default)]
    pub minimum: f64,
}

/// A catalog entry describing one way GenAI gets used in a phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UseKind {
    pub id: String,
    pub display_name: String,
    pub phase: ResearchPhase,
    pub allowed_tasks: Vec<TaskKind>,
    pub parameter_schema: Vec<FieldSpec>,
    #[serde(default)]
    pub defaults: BTreeMap<String, f64>,
}

impl UseKind {
    /// A kind with a single allowed task fixes the model type.
    pub fn is_locked(&self) -> bool {
        self.allowed_tasks.len() == 1
    }

    pub fn default_task(&self) -> TaskKind {
        self.allowed_tasks[0]
    }

    pub fn field(&self, id: &str) -> Option<&FieldSpec> {
        self.parameter_schema.iter().find(|f| f.id == id)
    }

    pub fn declares(&self, role: FieldRole) -> bool {
        self.parameter_schema.iter().any(|f| f.role == role)
    }
}
