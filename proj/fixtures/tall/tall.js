const box = document.getElementById('box');
const msg = document.getElementById('msg');
document.getElementById('expand').addEventListener('click', () => box.classList.add('tall'));
document.getElementById('collapse').addEventListener('click', () => { box.style.width = '80px'; });
document.getElementById('mark').addEventListener('click', () => box.classList.toggle('marked'));
document.getElementById('note').addEventListener('click', () => { msg.textContent = 'A note was added.'; });
document.getElementById('bottom-btn').addEventListener('click', () => { msg.textContent = 'Bottom button pressed.'; });
