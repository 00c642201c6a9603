//! The ReAct runtime on its own: a custom tool, a prompt template and a
//! scripted model, including one malformed reply that earns a correction.
//!
//!     cargo run --example react_loop

use gm_core::llm::ScriptedBackend;
use gm_core::react::{run_loop, Agent, Bindings, LoopConfig, PromptTemplate, Registry, Tool};
use gm_core::state::StepClock;

/// Counts coins in a purse.
struct CountCoins;

impl Tool<Vec<u32>> for CountCoins {
    fn name(&self) -> &str {
        "CountCoins"
    }

    fn description(&self, _: &Vec<u32>) -> String {
        "Tells how many coins are in the purse. Input is ignored.".into()
    }

    fn run(&self, purse: &mut Vec<u32>, _input: &str) -> String {
        format!("The purse holds {} coins.", purse.iter().sum::<u32>())
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let registry = Registry::new().with(CountCoins)?;
    let template = PromptTemplate::new(
        "You keep the party's accounts.\nTools:\n{tools}\nUse one of [{tool_names}].\nQuestion: {question}\n{history}",
    );
    let backend = ScriptedBackend::from_responses([
        "I think the purse is heavy.",
        "Thought: Do I need to use a tool? Yes.\nAction: CountCoins\nAction Input: {}",
        "Thought: Do I need to use a tool? No.\nFinal Answer: You carry 17 coins. [END]",
    ]);
    let mut bindings = Bindings::new();
    bindings.insert("question".into(), "How much money do we have?".into());
    let mut purse = vec![5, 12];
    let agent = Agent {
        template: &template,
        registry: &registry,
    };
    let trajectory = run_loop(&agent, &bindings, &mut purse, &backend, &LoopConfig::default(), &StepClock::fixed())?;

    for failure in &trajectory.parse_failures {
        println!("Rejected reply {:?}: {}", failure.raw, failure.reason);
    }
    for step in &trajectory.steps {
        println!("{} -> {}", step.action.as_deref().unwrap_or("-"), step.observation.as_deref().unwrap_or(""));
    }
    println!("Final answer: {}", trajectory.final_answer.as_deref().unwrap_or(""));
    println!("Model calls: {}", trajectory.model_calls);
    println!("\nLast prompt sent:\n{}", backend.transcript().last().unwrap().request.messages[0].content);
    Ok(())
}
