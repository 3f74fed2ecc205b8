//! Prompt wording and the default two-agent support crew.
//!
//! Placeholders use `{name}` and are filled from the run inputs. `{context}`
//! in a task description is replaced by the rendered context block.

use super::{AgentSpec, TaskSpec};

/// System message. Filled with `{role}`, `{goal}`, `{backstory}` and `{tools}`.
pub const SYSTEM_TEMPLATE: &str = "You are {role}.\n\
Your goal: {goal}\n\n\
{backstory}\n\n\
{tools}\
Answer in a friendly, precise and complete way.";

pub const TOOLS_NONE: &str = "";
pub const TOOLS_PREFIX: &str = "Tool results gathered for you before this task: ";

pub const EXPECTED_OUTPUT_LABEL: &str = "Expected output:";
pub const CONTEXT_HEADER: &str = "# Context";
pub const TOOL_FAILURE_NOTE: &str = "The tool could not be used";
pub const TRUNCATION_MARKER: &str = "\n[... content truncated]";

/// Upper bound on characters any tool contributes to a prompt, marker included.
pub const MAX_TOOL_CHARS: usize = 8_000;

pub const SUPPORT_ROLE: &str = "Senior Support Representative";
pub const QA_ROLE: &str = "Support Quality Assurance Specialist";
pub const SCRAPE_TOOL_NAME: &str = "scrape_website";

pub const SUPPORT_TASK_ID: &str = "query_solving";
pub const QA_TASK_ID: &str = "quality_inspection";

pub fn support_agent(with_scrape_tool: bool) -> AgentSpec {
    AgentSpec {
        role: SUPPORT_ROLE.into(),
        goal: "Be the most friendly and helpful financial-literacy support representative on the team.".into(),
        backstory: "You help people understand personal finance, inflation and investing. \
You are now supporting {person}, who has a question about finance. \
Give complete answers and make no assumptions; rely on the material you were given."
            .into(),
        tools: if with_scrape_tool {
            vec![SCRAPE_TOOL_NAME.into()]
        } else {
            Vec::new()
        },
    }
}

pub fn qa_agent() -> AgentSpec {
    AgentSpec {
        role: QA_ROLE.into(),
        goal: "Make sure every answer the support team sends is correct, detailed and polite.".into(),
        backstory: "You review the support representative's draft for {person}. \
Check that every part of the question is addressed, fix mistakes, \
and make the tone friendly without losing precision."
            .into(),
        tools: Vec::new(),
    }
}

pub fn query_solving_task() -> TaskSpec {
    TaskSpec {
        id: SUPPORT_TASK_ID.into(),
        description: "{person} just reached out with a question:\n{question}\n\n\
Understand the question in light of who is asking, use everything available to you, \
and write a complete answer that addresses every part of it."
            .into(),
        expected_output: "A detailed, informative draft answer to the question.".into(),
        assigned_agent: SUPPORT_ROLE.into(),
    }
}

pub fn quality_inspection_task() -> TaskSpec {
    TaskSpec {
        id: QA_TASK_ID.into(),
        description: "Review the draft answer prepared for {person}, who asked:\n{question}\n\n\
Make sure it is accurate, complete and polite, then produce the final answer."
            .into(),
        expected_output: "The final answer to send to the person, ready to deliver.".into(),
        assigned_agent: QA_ROLE.into(),
    }
}

/// Support agent then QA agent, with their two tasks in execution order.
pub fn default_crew(with_scrape_tool: bool) -> (Vec<AgentSpec>, Vec<TaskSpec>) {
    (
        vec![support_agent(with_scrape_tool), qa_agent()],
        vec![query_solving_task(), quality_inspection_task()],
    )
}
