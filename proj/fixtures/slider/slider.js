// Value 0..100 along a 500px track. window.__slider mirrors the value for tests.
const track = document.getElementById('track');
const handle = document.getElementById('handle');
const fill = document.getElementById('fill');
const out = document.getElementById('value');
function set(v) {
  v = Math.max(0, Math.min(100, Math.round(v)));
  window.__slider = v;
  handle.style.left = (v * 5) + 'px';
  fill.style.width = (v * 5) + 'px';
  out.textContent = String(v);
}
set(30);
let dragging = false;
function fromEvent(e) {
  const r = track.getBoundingClientRect();
  set((e.clientX - r.left) / r.width * 100);
}
handle.addEventListener('mousedown', (e) => { dragging = true; e.preventDefault(); });
track.addEventListener('mousedown', (e) => { dragging = true; fromEvent(e); e.preventDefault(); });
document.addEventListener('mousemove', (e) => { if (dragging) fromEvent(e); });
document.addEventListener('mouseup', (e) => { if (dragging) { fromEvent(e); dragging = false; } });
const on = (id, f) => document.getElementById(id).addEventListener('click', f);
on('min', () => set(0));
on('dec', () => set(window.__slider - 10));
on('inc', () => set(window.__slider + 10));
on('max', () => set(100));
on('reset', () => set(50));
on('half', () => set(window.__slider / 2));
on('quarter', () => set(25));
