//! `fincast chat`: the two-agent support crew.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use fincast_core::agents::{
    self, http_chat_backend, templates, ChatBackend, CrewRunLog, ScrapeWebsiteTool, ScriptedBackend, Tool,
    DEFAULT_MODEL,
};
use serde::Serialize;
use serde_json::json;

use crate::failure::{CmdResult, Failure, EXIT_BACKEND};
use crate::run::{read_input, Run};
use crate::OutputArgs;

pub const API_KEY_VAR: &str = "FINCAST_API_KEY";

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChatArgs {
    #[arg(long)]
    pub question: String,
    /// Name of the person asking
    #[arg(long, default_value = "there")]
    pub person: String,
    /// Page the support agent scrapes before answering
    #[arg(long)]
    pub url: Option<String>,
    /// OpenAI-compatible chat-completions URL
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long, default_value = DEFAULT_MODEL)]
    pub model: String,
    /// JSON list of canned replies used instead of a live endpoint
    #[arg(long, value_name = "FILE", conflicts_with = "endpoint")]
    pub stub: Option<PathBuf>,
}

pub fn run(args: &ChatArgs, out: &OutputArgs) -> CmdResult<()> {
    let mut run = Run::start(&out.out_dir, "chat", out.tag.as_deref(), json!(args))?;
    let mut backend: Box<dyn ChatBackend> = match (&args.stub, &args.endpoint) {
        (Some(path), _) => {
            let bytes = read_input(path)?;
            run.input(path, &bytes);
            let text = String::from_utf8_lossy(&bytes);
            Box::new(ScriptedBackend::from_json(&text)?)
        }
        (None, Some(endpoint)) => {
            let key = std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty());
            if key.is_none() {
                run.warn(format!("{API_KEY_VAR} is not set; calling {endpoint} without authorization"));
            }
            Box::new(http_chat_backend(endpoint, &args.model, key.as_deref())?)
        }
        (None, None) => {
            return Err(Failure::new(
                EXIT_BACKEND,
                format!(
                    "no chat backend: pass --stub FILE for canned replies, or --endpoint URL \
                     (with {API_KEY_VAR} set) for a live model"
                ),
            ))
        }
    };

    let (agent_specs, tasks) = templates::default_crew(args.url.is_some());
    let tools: Vec<Box<dyn Tool>> = match &args.url {
        Some(url) => vec![Box::new(ScrapeWebsiteTool::new(url.clone()))],
        None => Vec::new(),
    };
    let mut inputs = BTreeMap::new();
    inputs.insert("question".to_string(), args.question.clone());
    inputs.insert("person".to_string(), args.person.clone());

    let log = agents::run_crew(&agent_specs, &tasks, backend.as_mut(), &tools, &inputs)?;
    print!("{}", staged_transcript(&log));
    for inv in log.entries.iter().flat_map(|e| &e.tool_invocations) {
        if let Some(err) = &inv.error {
            run.warn(format!("{} failed: {err}", inv.tool));
        }
    }
    run.write("transcript.jsonl", log.to_jsonl().as_bytes())?;
    run.summary(json!({ "tasks": log.entries.len(), "final_answer_chars": log.final_answer.chars().count() }));
    let dir = run.finish()?;
    eprintln!("wrote {}", dir.display());
    Ok(())
}

/// Human-readable transcript: one section per task, then the final answer.
pub fn staged_transcript(log: &CrewRunLog) -> String {
    let mut out = String::new();
    let total = log.entries.len();
    for (i, entry) in log.entries.iter().enumerate() {
        out.push_str(&format!("== [{}/{total}] {} :: {}\n", i + 1, entry.agent_role, entry.task_id));
        for inv in &entry.tool_invocations {
            let target = inv.url.as_deref().unwrap_or("-");
            match &inv.error {
                None => out.push_str(&format!(
                    "   tool {} {target}: {} bytes fetched, {} chars in prompt\n",
                    inv.tool, inv.bytes_fetched, inv.chars_in_prompt
                )),
                Some(e) => out.push_str(&format!("   tool {} {target} failed: {e}\n", inv.tool)),
            }
        }
        out.push_str(&entry.reply);
        out.push_str("\n\n");
    }
    out.push_str("== Final answer\n");
    out.push_str(&log.final_answer);
    out.push('\n');
    out
}
