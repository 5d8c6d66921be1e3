// In-page oracle: every change the page sees to a field, in order.
window.__log = [];
const user = document.getElementById('user');
const pass = document.getElementById('pass');
for (const el of [user, pass]) {
  el.addEventListener('input', () => window.__log.push({type: 'input', field: el.id, value: el.value}));
}
document.addEventListener('click', (e) => window.__log.push({type: 'click', target: e.target.id || e.target.tagName}), true);

document.getElementById('form').addEventListener('submit', (e) => {
  const err = document.getElementById('error');
  if (!/^[^@\s]+@[^@\s]+$/.test(user.value) || pass.value.length < 4) {
    e.preventDefault();
    err.textContent = 'Please enter a valid e-mail address and password.';
  }
});
document.getElementById('reveal').addEventListener('click', (e) => {
  const shown = pass.type === 'text';
  pass.type = shown ? 'password' : 'text';
  e.target.textContent = shown ? 'Show password' : 'Hide password';
});
document.getElementById('clear').addEventListener('click', () => {
  user.value = '';
  pass.value = '';
  document.getElementById('error').textContent = '';
  document.getElementById('status').textContent = 'Form cleared.';
});
