import init, { analyze_polynomial, check_code, simulate_15_to_1 } from "./pkg/triortho_demo.js";

const $ = (id) => document.getElementById(id);
const show = (id, json) => { $(id).textContent = JSON.stringify(JSON.parse(json), null, 2); };

const SAMPLE = [
  "001011001101001",
  "---",
  "101010101010101",
  "011001100110011",
  "000111100001111",
  "000000011111111",
].join("
");

await init();
$("code").value = SAMPLE;

$("analyze").onclick = () => show("analyze-out", analyze_polynomial($("poly").value, Number($("vars").value)));
$("check").onclick = () => show("check-out", check_code($("code").value));
$("simulate").onclick = () =>
  show("simulate-out", simulate_15_to_1(
    Number($("shots").value),
    Number($("noise").value),
    BigInt($("seed").value || 0),
    $("delayed").checked,
  ));
