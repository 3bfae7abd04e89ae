import init, { classify_point, phase_diagram, operator_norm } from "./pkg/hlx_web.js";

const $ = (id) => document.getElementById(id);
const int = (id) => parseInt($(id).value, 10);

function show(id, text) {
  const data = JSON.parse(text);
  $(id).textContent = JSON.stringify(data, null, 2);
}

await init();

$("c-go").onclick = () =>
  show("c-out", classify_point(int("c-m"), parseFloat($("c-r").value), $("c-p").value, $("c-field").value));

$("d-go").onclick = () => {
  const svg = phase_diagram(int("d-m"), parseFloat($("d-r").value), parseFloat($("d-p").value), 120);
  $("diagram").innerHTML = svg.startsWith("<svg") ? svg : `<pre>${svg}</pre>`;
};

$("n-go").onclick = () =>
  show("n-out", operator_norm($("n-family").value, int("n-m"), int("n-n"), $("n-p").value, int("n-seed"), $("n-method").value));

$("c-go").click();
$("d-go").click();
