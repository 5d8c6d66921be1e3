const who = new URLSearchParams(location.search).get('user') || 'stranger';
document.getElementById('who').textContent = who;
