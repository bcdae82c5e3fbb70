import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'numtheory_platform.settings')
django.setup()
