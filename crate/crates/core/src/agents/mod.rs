//! Sequential two-agent support crew.
//!
//! Tasks run strictly in declaration order. Before its completion call, a
//! task runs every tool its agent lists; tool output and the replies of all
//! earlier tasks are placed in the prompt's context block. The last task's
//! reply is the final answer.

mod backend;
mod scrape;
pub mod templates;

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use backend::{
    http_chat_backend, parse_completion, BackendError, ChatBackend, EchoBackend, HttpChatBackend, ScriptedBackend,
    DEFAULT_MODEL,
};
pub use scrape::{html_to_text, scrape_website, scrape_website_with_timeout, truncate_for_prompt, ScrapedPage, ToolError};

use templates::{CONTEXT_HEADER, EXPECTED_OUTPUT_LABEL, SYSTEM_TEMPLATE, TOOLS_PREFIX, TOOL_FAILURE_NOTE};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("no tasks to run")]
    NoTasks,
    #[error("task {task:?} is assigned to unknown agent {role:?}")]
    UnknownAgent { task: String, role: String },
    #[error("missing value for placeholder {{{0}}}")]
    MissingPlaceholder(String),
    #[error("backend failed during task {task_id:?}: {source}")]
    Backend {
        task_id: String,
        #[source]
        source: BackendError,
    },
    #[error("invalid agent configuration: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub role: String,
    pub goal: String,
    pub backstory: String,
    pub tools: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub description: String,
    pub expected_output: String,
    /// Role of the agent that runs this task.
    pub assigned_agent: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChatRole {
    System,
    User,
    Assistant,
}

impl ChatRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChatRole::System => "system",
            ChatRole::User => "user",
            ChatRole::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: ChatRole,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Self {
            role: ChatRole::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: ChatRole::User,
            content: content.into(),
        }
    }
}

/// One labelled piece of prompt context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextItem {
    pub label: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInvocation {
    pub tool: String,
    pub url: Option<String>,
    pub bytes_fetched: usize,
    /// Characters placed in the prompt (tool text or failure note).
    pub chars_in_prompt: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrewLogEntry {
    pub task_id: String,
    pub agent_role: String,
    pub prompt: Vec<Message>,
    pub reply: String,
    pub tool_invocations: Vec<ToolInvocation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrewRunLog {
    pub entries: Vec<CrewLogEntry>,
    pub final_answer: String,
}

impl CrewRunLog {
    /// One JSON object per task entry, then `{"final_answer": ...}`.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&serde_json::to_string(entry).expect("log entries serialize"));
            out.push('\n');
        }
        out.push_str(&serde_json::json!({ "final_answer": self.final_answer }).to_string());
        out.push('\n');
        out
    }
}

/// Output of a tool run: text for the prompt plus fetch accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolOutput {
    pub text: String,
    pub bytes_fetched: usize,
}

pub trait Tool {
    fn name(&self) -> &str;
    /// URL or other target, for the run log.
    fn target(&self) -> Option<&str> {
        None
    }
    fn run(&self) -> Result<ToolOutput, ToolError>;
}

/// Scrapes one configured page.
#[derive(Debug, Clone)]
pub struct ScrapeWebsiteTool {
    pub url: String,
    pub timeout: Duration,
}

impl ScrapeWebsiteTool {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            timeout: Duration::from_secs(30),
        }
    }
}

impl Tool for ScrapeWebsiteTool {
    fn name(&self) -> &str {
        templates::SCRAPE_TOOL_NAME
    }

    fn target(&self) -> Option<&str> {
        Some(&self.url)
    }

    fn run(&self) -> Result<ToolOutput, ToolError> {
        let page = scrape_website_with_timeout(&self.url, self.timeout)?;
        Ok(ToolOutput {
            text: page.text,
            bytes_fetched: page.bytes_fetched,
        })
    }
}

/// Substitutes `{name}` placeholders. Braces not enclosing an identifier are
/// left as they are.
pub fn fill_placeholders(template: &str, values: &BTreeMap<String, String>) -> Result<String, AgentError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let ident_len = after
            .char_indices()
            .take_while(|&(i, c)| c == '_' || c.is_ascii_alphabetic() || (i > 0 && c.is_ascii_digit()))
            .count();
        if ident_len > 0 && after[ident_len..].starts_with('}') {
            let name = &after[..ident_len];
            let value = values
                .get(name)
                .ok_or_else(|| AgentError::MissingPlaceholder(name.to_string()))?;
            out.push_str(value);
            rest = &after[ident_len + 1..];
        } else {
            out.push('{');
            rest = after;
        }
    }
    out.push_str(rest);
    Ok(out)
}

fn render_context(context: &[ContextItem]) -> String {
    let mut block = String::from(CONTEXT_HEADER);
    for item in context {
        block.push_str("\n\n## ");
        block.push_str(&item.label);
        block.push('\n');
        block.push_str(&item.content);
    }
    block
}

/// Builds the system and user messages for one task.
///
/// The system message carries the agent's role, goal, backstory and tool
/// note; the user message carries the task description, expected output and,
/// when `context` is non-empty, a labelled context block (or fills
/// `{context}` if the description asks for it).
pub fn render_prompt(
    agent: &AgentSpec,
    task: &TaskSpec,
    inputs: &BTreeMap<String, String>,
    context: &[ContextItem],
) -> Result<Vec<Message>, AgentError> {
    let tools_note = if agent.tools.is_empty() {
        String::new()
    } else {
        format!("{TOOLS_PREFIX}{}.\n\n", agent.tools.join(", "))
    };
    let mut system_values = BTreeMap::new();
    system_values.insert("role".to_string(), agent.role.clone());
    system_values.insert("goal".to_string(), fill_placeholders(&agent.goal, inputs)?);
    system_values.insert("backstory".to_string(), fill_placeholders(&agent.backstory, inputs)?);
    system_values.insert("tools".to_string(), tools_note);
    let system = fill_placeholders(SYSTEM_TEMPLATE, &system_values)?;

    let wants_inline_context = task.description.contains("{context}");
    let mut values = inputs.clone();
    if wants_inline_context {
        values.insert("context".to_string(), render_context(context));
    }
    let mut user = fill_placeholders(&task.description, &values)?;
    user.push_str("\n\n");
    user.push_str(EXPECTED_OUTPUT_LABEL);
    user.push(' ');
    user.push_str(&fill_placeholders(&task.expected_output, inputs)?);
    if !context.is_empty() && !wants_inline_context {
        user.push_str("\n\n");
        user.push_str(&render_context(context));
    }
    Ok(vec![Message::system(system), Message::user(user)])
}

/// Runs every task in order against `backend` and returns the transcript.
///
/// Tool failures are recorded and noted in the prompt; backend failures abort
/// the run with the failing task's id.
pub fn run_crew(
    agents: &[AgentSpec],
    tasks: &[TaskSpec],
    backend: &mut dyn ChatBackend,
    tools: &[Box<dyn Tool>],
    inputs: &BTreeMap<String, String>,
) -> Result<CrewRunLog, AgentError> {
    if tasks.is_empty() {
        return Err(AgentError::NoTasks);
    }
    for agent in agents {
        if agent.role.trim().is_empty() || agent.goal.trim().is_empty() {
            return Err(AgentError::InvalidSpec("agents need a role and a goal".into()));
        }
    }
    let assigned: Vec<&AgentSpec> = tasks
        .iter()
        .map(|task| {
            agents
                .iter()
                .find(|a| a.role == task.assigned_agent)
                .ok_or_else(|| AgentError::UnknownAgent {
                    task: task.id.clone(),
                    role: task.assigned_agent.clone(),
                })
        })
        .collect::<Result<_, _>>()?;

    let mut entries: Vec<CrewLogEntry> = Vec::with_capacity(tasks.len());
    for (task, agent) in tasks.iter().zip(assigned) {
        let mut context = Vec::new();
        let mut invocations = Vec::new();
        for tool_name in &agent.tools {
            let tool = tools.iter().find(|t| t.name() == tool_name);
            let result = match tool {
                Some(t) => t.run(),
                None => Err(ToolError::Unknown(tool_name.clone())),
            };
            let target = tool.and_then(|t| t.target()).map(str::to_string);
            let label = match &target {
                Some(url) => format!("Tool {tool_name} ({url})"),
                None => format!("Tool {tool_name}"),
            };
            let (content, bytes_fetched, error) = match result {
                Ok(out) => (truncate_for_prompt(&out.text), out.bytes_fetched, None),
                Err(e) => (format!("{TOOL_FAILURE_NOTE}: {e}"), 0, Some(e.to_string())),
            };
            invocations.push(ToolInvocation {
                tool: tool_name.clone(),
                url: target,
                bytes_fetched,
                chars_in_prompt: content.chars().count(),
                error,
            });
            context.push(ContextItem { label, content });
        }
        for prior in &entries {
            context.push(ContextItem {
                label: format!("Output of task {} ({})", prior.task_id, prior.agent_role),
                content: prior.reply.clone(),
            });
        }
        let prompt = render_prompt(agent, task, inputs, &context)?;
        let reply = backend.complete(&prompt).map_err(|source| AgentError::Backend {
            task_id: task.id.clone(),
            source,
        })?;
        entries.push(CrewLogEntry {
            task_id: task.id.clone(),
            agent_role: agent.role.clone(),
            prompt,
            reply,
            tool_invocations: invocations,
        });
    }
    let final_answer = entries.last().map(|e| e.reply.clone()).unwrap_or_default();
    Ok(CrewRunLog { entries, final_answer })
}
