import init, { compareSpectra, betheStates, identityNames, identityResidual } from "./pkg/twisted_xxx_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x) => x.toExponential(2);
const cfmt = ([re, im]) => `${re.toFixed(6)} ${im < 0 ? "-" : "+"} ${Math.abs(im).toFixed(6)}i`;
const verdict = (x, tol) => `<span class="${x < tol ? "good" : "bad"}">${fmt(x)}</span>`;
const common = () => [Number($("n").value), $("xi").value, $("u").value];

function guarded(out, f) {
  try {
    out.innerHTML = f();
  } catch (e) {
    out.innerHTML = `<pre class="bad">${e.message ?? e}</pre>`;
  }
}

function spectra() {
  const r = JSON.parse(compareSpectra(...common()));
  const rows = r.hamiltonian_deformed
    .map((h, i) => `<tr><td>${cfmt(h)}</td><td>${cfmt(r.hamiltonian_undeformed[i])}</td>` +
      `<td>${cfmt(r.transfer_deformed[i])}</td><td>${cfmt(r.transfer_undeformed[i])}</td></tr>`)
    .join("");
  return `<p>max distance: H ${verdict(r.hamiltonian_distance, 1e-8)}, t(u) ${verdict(r.transfer_distance, 1e-8)}</p>` +
    `<table><tr><th>H(&xi;)</th><th>H(0)</th><th>t<sub>&xi;</sub>(u)</th><th>t<sub>0</sub>(u)</th></tr>${rows}</table>`;
}

function bethe() {
  const states = JSON.parse(betheStates(...common()));
  if (states.length === 0) return "<p>No regular Bethe states found from the standard seeds.</p>";
  const rows = states
    .map((s) => `<tr><td>${s.magnons}</td><td>${s.roots.map(cfmt).join("<br>")}</td><td>${fmt(s.bethe_defect)}</td>` +
      `<td>${cfmt(s.lambda)}</td><td>${verdict(s.spectrum_distance, 1e-8)}</td><td>${fmt(s.eigenvector_defect)}</td></tr>`)
    .join("");
  return `<table><tr><th>M</th><th>roots</th><th>Bethe defect</th><th>&Lambda;(u)</th>` +
    `<th>distance to spectrum of t(u)</th><th>eigenvector defect</th></tr>${rows}</table>`;
}

function residual() {
  const [n, xi, u] = common();
  const r = JSON.parse(identityResidual($("identity").value, n, xi, u, $("v").value));
  return `<p>${r.name}: relative residual ${verdict(r.residual, 1e-10)}</p>`;
}

await init();
const catalog = JSON.parse(identityNames());
for (const { name } of catalog) $("identity").add(new Option(name, name));
const showFormula = () => { $("formula").textContent = catalog.find((c) => c.name === $("identity").value).formula; };
$("identity").addEventListener("change", showFormula);
showFormula();

$("spectra").addEventListener("click", () => guarded($("spectra-out"), spectra));
$("bethe").addEventListener("click", () => guarded($("bethe-out"), bethe));
$("residual").addEventListener("click", () => guarded($("residual-out"), residual));
