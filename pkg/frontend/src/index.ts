export * from "./types.js";
export * from "./scoring.js";
export * from "./validation.js";
export * from "./diff.js";
export * from "./api.js";
export * from "./poll.js";
export * from "./state.js";
export * from "./render.js";
export * from "./consoles/base.js";
export * from "./consoles/rubric.js";
export * from "./consoles/scores.js";
export * from "./consoles/questions.js";
export * from "./consoles/reassessment.js";
export * from "./consoles/student.js";
export * from "./timeline.js";
export * from "./page.js";
