//! Compiled-in catalog contents.

use std::collections::BTreeMap;

use super::types::*;
use crate::quantity::{PerUnitKWh, WattHours};

use ResearchPhase::*;
use TaskKind::*;

/// Measured Wh per interaction for each proxy model, as decimal literals.
pub(crate) const ENERGY_TABLE: [(TaskKind, &str, &str); 13] = [
    (TextToText, "Llama-3.1-Instruct", "0.004685"),
    (TextToImage, "Stable-diffusion-XL", "0.001301"),
    (AudioToText, "Whisper", "0.006335"),
    (TextToVideo, "AnimateDiff", "0.021742"),
    (TextTo3d, "Shap-E", "0.026320"),
    (TextToAudio, "MusicGen", "0.011418"),
    (ImageToText, "BLIP", "0.003423"),
    (ImageToImage, "Instruct-Pix2Pix", "0.000885"),
    (ImageTo3d, "One-2-3-45", "0.013010"),
    (VideoToText, "XCLIP", "0.001040"),
    (VideoToVideo, "RIFE", "0.026020"),
    (AudioToAudio, "FreeVC", "0.006335"),
    (ImageToVideo, "SadTalker", "0.026020"),
];

pub const BASELINE_WORDS_PER_PROMPT: f64 = 500.0;
pub const BASELINE_IMAGE_SIDE: f64 = 1024.0;
pub const BASELINE_CLIP_SECONDS: f64 = 2.0;
pub const BASELINE_AUDIO_MINUTES: f64 = 1.0;
/// Average article length assumed for literature processing.
pub const WORDS_PER_ARTICLE: f64 = 6000.0;

fn unit_and_baseline(task: TaskKind) -> (CanonicalUnit, Option<Resolution>) {
    let words = Resolution::Words {
        words: BASELINE_WORDS_PER_PROMPT,
    };
    let pixels = Resolution::Pixels {
        width: BASELINE_IMAGE_SIDE,
        height: BASELINE_IMAGE_SIDE,
    };
    let clip = Resolution::Seconds {
        seconds: BASELINE_CLIP_SECONDS,
    };
    let audio = Resolution::Minutes {
        minutes: BASELINE_AUDIO_MINUTES,
    };
    match task {
        TextToText => (CanonicalUnit::Prompt, Some(words)),
        ImageToText => (CanonicalUnit::Prompt, Some(pixels)),
        VideoToText => (CanonicalUnit::Prompt, Some(clip)),
        TextToImage | ImageToImage => (CanonicalUnit::Image, Some(pixels)),
        AudioToText | AudioToAudio => (CanonicalUnit::MinuteOfAudio, Some(audio)),
        TextToVideo | VideoToVideo | ImageToVideo => (CanonicalUnit::VideoClip, Some(clip)),
        TextToAudio => (CanonicalUnit::AudioClip, None),
        TextTo3d | ImageTo3d => (CanonicalUnit::Asset3d, None),
    }
}

pub(crate) fn tasks() -> Vec<TaskType> {
    ENERGY_TABLE
        .iter()
        .map(|&(id, proxy_model, literal)| {
            let (canonical_unit, baseline_resolution) = unit_and_baseline(id);
            TaskType {
                id,
                proxy_model,
                energy_per_unit: WattHours(literal.parse().expect("energy literal")),
                energy_literal: literal,
                energy_per_unit_kwh: PerUnitKWh::from_wh_decimal(literal).expect("energy literal"),
                canonical_unit,
                baseline_resolution,
            }
        })
        .collect()
}

fn field(
    id: &str,
    label: &str,
    value_kind: ValueKind,
    role: FieldRole,
    required: bool,
) -> FieldSpec {
    FieldSpec {
        id: id.to_string(),
        label: label.to_string(),
        value_kind,
        role,
        required,
        minimum: 0.0,
    }
}

fn count(id: &str, label: &str) -> FieldSpec {
    field(id, label, ValueKind::Count, FieldRole::Usage, true)
}

fn words_per_prompt() -> FieldSpec {
    field(
        "words_per_prompt",
        "Average prompt length (words)",
        ValueKind::WordCount,
        FieldRole::PromptWords,
        false,
    )
}

fn image_fields() -> [FieldSpec; 2] {
    [
        field(
            "image_width",
            "Image width (px)",
            ValueKind::PixelDimensions,
            FieldRole::ImageWidth,
            false,
        ),
        field(
            "image_height",
            "Image height (px)",
            ValueKind::PixelDimensions,
            FieldRole::ImageHeight,
            false,
        ),
    ]
}

fn clip_seconds() -> FieldSpec {
    field(
        "clip_seconds",
        "Clip length (seconds)",
        ValueKind::Seconds,
        FieldRole::ClipSeconds,
        false,
    )
}

fn test_runs() -> FieldSpec {
    field(
        "test_runs",
        "Number of test runs during prototyping",
        ValueKind::Count,
        FieldRole::TestRuns,
        false,
    )
}

fn interactions(required: bool) -> FieldSpec {
    field(
        "interactions",
        "Number of interactions during evaluation",
        ValueKind::Count,
        FieldRole::Interactions,
        required,
    )
}

struct KindBuilder(UseKind);

impl KindBuilder {
    fn new(id: &str, display_name: &str, phase: ResearchPhase, tasks: &[TaskKind]) -> Self {
        Self(UseKind {
            id: id.to_string(),
            display_name: display_name.to_string(),
            phase,
            allowed_tasks: tasks.to_vec(),
            parameter_schema: Vec::new(),
            defaults: BTreeMap::new(),
        })
    }

    fn field(mut self, spec: FieldSpec) -> Self {
        self.0.parameter_schema.push(spec);
        self
    }

    fn fields(mut self, specs: impl IntoIterator<Item = FieldSpec>) -> Self {
        self.0.parameter_schema.extend(specs);
        self
    }

    /// Adds every resolution field applicable to at least one allowed task.
    fn resolution_fields(self) -> Self {
        let baselines: Vec<_> = self
            .0
            .allowed_tasks
            .iter()
            .map(|&t| unit_and_baseline(t).1)
            .collect();
        let any = |role: FieldRole| baselines.iter().any(|&b| role.applies_to(b));
        let mut out = self;
        if any(FieldRole::PromptWords) {
            out = out.field(words_per_prompt());
        }
        if any(FieldRole::ImageWidth) {
            out = out.fields(image_fields());
        }
        if any(FieldRole::ClipSeconds) {
            out = out.field(clip_seconds());
        }
        out
    }

    fn default(mut self, id: &str, value: f64) -> Self {
        self.0.defaults.insert(id.to_string(), value);
        self
    }

    fn build(self) -> UseKind {
        self.0
    }
}

fn prompt_kind(id: &str, name: &str, phase: ResearchPhase, tasks: &[TaskKind]) -> UseKind {
    KindBuilder::new(id, name, phase, tasks)
        .field(count("prompt_count", "Number of prompts"))
        .resolution_fields()
        .build()
}

fn generation_kind(id: &str, name: &str, phase: ResearchPhase, tasks: &[TaskKind]) -> UseKind {
    KindBuilder::new(id, name, phase, tasks)
        .field(count(
            "generation_count",
            "Number of generations (prompts, images, clips, assets)",
        ))
        .resolution_fields()
        .build()
}

fn training_kind(id: &str, name: &str) -> UseKind {
    KindBuilder::new(id, name, TrainingFineTuning, &TaskKind::ALL)
        .field(field(
            "gpu_hours",
            "Accelerator time (GPU-hours)",
            ValueKind::GpuHours,
            FieldRole::GpuHours,
            true,
        ))
        .field(FieldSpec {
            minimum: 1.0,
            ..field(
                "device_power_watts",
                "Average device power (W)",
                ValueKind::Watts,
                FieldRole::DevicePower,
                false,
            )
        })
        .field(FieldSpec {
            minimum: 1.0,
            ..field(
                "pue",
                "Datacenter power usage effectiveness",
                ValueKind::Ratio,
                FieldRole::Pue,
                false,
            )
        })
        .build()
}

const ALL_GENERATIVE: [TaskKind; 13] = TaskKind::ALL;
const VISUAL_OUTPUTS: [TaskKind; 4] = [TextToImage, ImageToImage, TextToVideo, TextTo3d];
const CONTENT_OUTPUTS: [TaskKind; 10] = [
    TextToText,
    TextToImage,
    TextToVideo,
    TextTo3d,
    TextToAudio,
    ImageToImage,
    ImageTo3d,
    ImageToVideo,
    VideoToVideo,
    AudioToAudio,
];

pub(crate) fn kinds() -> Vec<UseKind> {
    vec![
        // research planning
        prompt_kind(
            "research-gap-identification",
            "Identifying research gaps",
            ResearchPlanning,
            &[TextToText],
        ),
        generation_kind(
            "study-material-generation",
            "Generating study materials",
            ResearchPlanning,
            &[
                TextToText,
                TextToImage,
                TextToVideo,
                TextToAudio,
                ImageToImage,
            ],
        ),
        KindBuilder::new(
            "literature-review",
            "Literature review/search",
            ResearchPlanning,
            &[TextToText],
        )
        .field(count(
            "article_count",
            "Number of articles/documents processed",
        ))
        .field(field(
            "words_per_article",
            "Average words per article",
            ValueKind::WordCount,
            FieldRole::ItemWords,
            true,
        ))
        .default("words_per_article", WORDS_PER_ARTICLE)
        .build(),
        prompt_kind(
            "study-design",
            "Study design",
            ResearchPlanning,
            &[TextToText],
        ),
        generation_kind(
            "workshop-course-material",
            "Workshop and course material",
            ResearchPlanning,
            &[TextToText, TextToImage, ImageToText],
        ),
        // prototyping & building
        KindBuilder::new(
            "genai-prototype-integration",
            "Prototyping using GenAI functionality",
            PrototypingBuilding,
            &ALL_GENERATIVE,
        )
        .field(count("units_per_call", "Generations per API call"))
        .field(test_runs())
        .field(interactions(false))
        .resolution_fields()
        .default("units_per_call", 1.0)
        .default("test_runs", 0.0)
        .default("interactions", 0.0)
        .build(),
        KindBuilder::new(
            "customized-chatbot",
            "Customized chatbot",
            PrototypingBuilding,
            &[TextToText],
        )
        .field(count("prompts_per_call", "Prompts per conversation turn"))
        .field(test_runs())
        .field(interactions(false))
        .resolution_fields()
        .default("prompts_per_call", 1.0)
        .default("test_runs", 0.0)
        .default("interactions", 0.0)
        .build(),
        prompt_kind(
            "code-generation",
            "Generating code for systems",
            PrototypingBuilding,
            &[TextToText],
        ),
        generation_kind(
            "prototype-content-generation",
            "Generating content or visuals for a prototype",
            PrototypingBuilding,
            &CONTENT_OUTPUTS,
        ),
        // evaluation & user studies
        KindBuilder::new(
            "user-evaluation",
            "User evaluation of a GenAI prototype",
            EvaluationUserStudies,
            &ALL_GENERATIVE,
        )
        .field(count(
            "units_per_interaction",
            "Generations per interaction",
        ))
        .field(interactions(true))
        .resolution_fields()
        .default("units_per_interaction", 1.0)
        .build(),
        KindBuilder::new(
            "user-study",
            "User study with off-the-shelf GenAI",
            EvaluationUserStudies,
            &[TextToText, TextToImage, ImageToText, ImageToImage],
        )
        .field(count(
            "units_per_interaction",
            "Generations per interaction",
        ))
        .field(interactions(true))
        .resolution_fields()
        .default("units_per_interaction", 1.0)
        .build(),
        // data collection
        generation_kind(
            "dataset-generation",
            "Generating data for exploration",
            DataCollection,
            &ALL_GENERATIVE,
        ),
        generation_kind(
            "evaluation-data-generation",
            "Generating data for evaluation",
            DataCollection,
            &ALL_GENERATIVE,
        ),
        KindBuilder::new(
            "transcription",
            "Transcription of audio data",
            DataCollection,
            &[AudioToText],
        )
        .field(field(
            "minutes",
            "Minutes of audio transcribed",
            ValueKind::Minutes,
            FieldRole::AudioMinutes,
            true,
        ))
        .build(),
        prompt_kind(
            "simulated-human-data",
            "Simulating human-generated data",
            DataCollection,
            &[TextToText],
        ),
        // analysis & synthesis
        prompt_kind(
            "qualitative-analysis",
            "Qualitative analysis",
            AnalysisSynthesis,
            &[TextToText, ImageToText],
        ),
        prompt_kind(
            "quantitative-analysis",
            "Quantitative analysis",
            AnalysisSynthesis,
            &[TextToText],
        ),
        prompt_kind(
            "trend-identification",
            "Data trend identification",
            AnalysisSynthesis,
            &[TextToText],
        ),
        // dissemination & communication
        prompt_kind(
            "manuscript-text",
            "Generation of manuscript text",
            DisseminationCommunication,
            &[TextToText],
        ),
        prompt_kind(
            "text-improvement",
            "Suggestions for text improvement",
            DisseminationCommunication,
            &[TextToText],
        ),
        generation_kind(
            "figure-generation",
            "Graphics for articles and presentations",
            DisseminationCommunication,
            &VISUAL_OUTPUTS,
        ),
        // training & fine-tuning
        training_kind("model-training", "Training a novel GenAI model"),
        training_kind("fine-tuning", "Fine-tuning an existing GenAI model"),
    ]
}
