const tab = new URLSearchParams(location.search).get('tab');
if (tab) document.getElementById('tab').textContent = 'Tab ' + tab + ' of 2.';
