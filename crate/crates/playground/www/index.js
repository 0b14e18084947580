import init, { run, analyze, format } from "./pkg/choo_playground.js";

const EXAMPLES = {
  fixed: `const major == "medical";

main {
  choose {
    major == "english" -> tuition = 2000
    | major == "medical" -> tuition = 4000
    | major == "liberal" -> tuition = 2200
  };
  print(tuition)
}
`,
  interactive: `choose {
  const major == "english"
  | const major == "medical"
  | const major == "liberal"
}

main {
  choose {
    major == "english" -> tuition = 2000
    | major == "medical" -> tuition = 4000
    | major == "liberal" -> tuition = 2200
  };
  print(tuition)
}
`,
  nested: `choose {
  const item == "soup"
  | choose { const item == "tea" | const item == "coffee" }
}

const base == 3;

main {
  choose {
    item == "soup" -> price = base + 2
    | item == "tea" -> price = base
    | item == "coffee" -> price = base * 2 - 1
  };
  print(item);
  print(price)
}
`,
  overlap: `main {
  score = 75;
  choose {
    score >= 70 -> grade = "pass"
    | score >= 50 && score < 80 -> grade = "borderline"
  };
  print(grade)
}
`,
};

const $ = (id) => document.getElementById(id);
let answers = [];

function describe(event) {
  switch (event.type) {
    case "choice_request":
      return `choice ${event.choice_id}: ${event.alternatives.length} alternatives`;
    case "user_resolved":
      return `you picked alternative ${event.index} for choice ${event.choice_id}`;
    case "machine_move":
      return `machine took branch ${event.branch_index}: ${event.guard_text}`;
    case "output":
      return event.text;
    case "warning":
      return `warning: ${event.message}`;
    case "state":
      return null;
    case "done":
      return event.reason ? `done (${event.status}): ${event.reason}` : `done (${event.status})`;
    default:
      return JSON.stringify(event);
  }
}

function render(result) {
  const log = $("log");
  log.replaceChildren();
  $("banner").className = "";
  $("banner").textContent = "";
  $("prompt").replaceChildren();
  if (result.error) {
    $("diagnostics").textContent = result.error;
    return;
  }
  $("diagnostics").textContent = "";
  let bindings = {};
  for (const event of result.events) {
    if (event.type === "state") bindings = event.bindings;
    if (event.type === "done") {
      $("banner").className = event.status;
      $("banner").textContent = event.status === "success" ? "Success" : `Failure: ${event.reason}`;
    }
    const line = describe(event);
    if (line === null) continue;
    const div = document.createElement("div");
    div.className = event.type;
    div.textContent = line;
    log.append(div);
  }
  $("state").replaceChildren(
    ...Object.entries(bindings).map(([name, value]) => {
      const tr = document.createElement("tr");
      for (const text of [name, value]) {
        const td = document.createElement("td");
        td.textContent = text;
        tr.append(td);
      }
      return tr;
    }),
  );
  if (result.pending) {
    const heading = document.createElement("p");
    heading.textContent = "Choose one:";
    $("prompt").append(heading);
    result.pending.alternatives.forEach((alt, index) => {
      const button = document.createElement("button");
      button.textContent = alt;
      button.onclick = () => {
        answers.push(index);
        step();
      };
      $("prompt").append(button);
    });
  }
}

function step() {
  render(JSON.parse(run($("source").value, answers.join(","), $("first-match").checked)));
}

function restart() {
  answers = [];
  step();
}

function load() {
  $("source").value = EXAMPLES[$("example").value];
  restart();
}

await init();
$("example").onchange = load;
$("start").onclick = restart;
$("first-match").onchange = restart;
$("analyze").onclick = () => {
  const report = JSON.parse(analyze($("source").value));
  const lines = report.findings.map((f) => `${f.line}:${f.column}: ${f.message}`);
  if (report.stability) {
    const s = report.stability;
    lines.push(`${s.stable ? "stable" : "unstable"} (${s.witness}); ${s.pending_choices} pending choices`);
  }
  $("diagnostics").textContent = lines.join("\n");
};
$("format").onclick = () => {
  const result = JSON.parse(format($("source").value));
  if (result.error) {
    $("diagnostics").textContent = result.error;
  } else {
    $("source").value = result.text;
  }
};
load();
