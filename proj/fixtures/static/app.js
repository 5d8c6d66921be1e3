document.getElementById('show').addEventListener('click', () => {
  const d = document.getElementById('details');
  d.style.display = d.style.display === 'block' ? 'none' : 'block';
});
document.getElementById('colour').addEventListener('click', () => {
  document.getElementById('swatch').style.background = '#c0392b';
});
document.getElementById('add').addEventListener('click', () => {
  const li = document.createElement('li');
  li.textContent = 'item ' + (document.querySelectorAll('#items li').length + 1);
  document.getElementById('items').appendChild(li);
});
document.getElementById('stamp').addEventListener('click', () => {
  document.getElementById('stamped').textContent = 'Stamped by the stamp button.';
});
